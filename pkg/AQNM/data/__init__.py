'''create sweep dataset and worker-pool dataloader'''
import logging
import multiprocessing

from tqdm import tqdm

from data.sweep import SweepDataset, run_point


def create_dataloader(dataset, jobs=1, progress=True):
    '''
    Run every point of a sweep and return the results in point order.

    jobs > 1 maps the points over a process pool; jobs == 1 runs inline.
    '''
    if jobs < 1:
        raise NotImplementedError(
            'Dataloader with [{:d}] workers is not supported.'.format(jobs))
    work = [(dataset.fn, point) for point in dataset.points]
    bar = dict(desc=dataset.name, total=len(work), disable=not progress, leave=False)
    if jobs == 1 or len(work) <= 1:
        return [run_point(job) for job in tqdm(work, **bar)]
    with multiprocessing.Pool(processes=min(jobs, len(work))) as pool:
        return list(tqdm(pool.imap(run_point, work), **bar))


def create_dataset(name, fn, points=None):
    '''create sweep dataset'''
    dataset = SweepDataset(name=name, fn=fn, points=list(points or []))
    logger = logging.getLogger('base')
    logger.info('Dataset [{:s} - {:s}] is created with {:d} points.'.format(
        dataset.__class__.__name__, name, len(dataset)))
    return dataset

from dataclasses import dataclass, field
from typing import Callable, List


@dataclass
class SweepDataset:
    '''
    Ordered sweep points of one pure job function.

    Each point is a kwargs dict; the job for point i is fn(**points[i]).
    Jobs carry their own seed and spawn key, so results do not depend on
    which worker runs them.
    '''
    name: str
    fn: Callable
    points: List[dict] = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, index):
        return self.points[index]

    def add(self, **kwargs):
        self.points.append(kwargs)
        return self


def run_point(job):
    fn, kwargs = job
    return fn(**kwargs)

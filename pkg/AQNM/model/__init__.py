import logging
logger = logging.getLogger('base')


def create_model(opt, tb_logger=None, wandb_logger=None):
    from .model import EXPERIMENTS
    M = EXPERIMENTS.get(opt['preset'])
    if M is None:
        raise NotImplementedError('Experiment [{:s}] is not recognized.'.format(opt['preset']))
    m = M(opt, tb_logger, wandb_logger)
    logger.info('Model [{:s}] is created.'.format(m.__class__.__name__))
    return m

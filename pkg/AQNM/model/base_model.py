import os
import logging
from collections import OrderedDict

import core.writer as Writer

logger = logging.getLogger('base')


class BaseExperiment():
    '''
    One preset. run() computes and saves the result tables, check() returns
    the list of failed acceptance checks.
    '''
    def __init__(self, opt, tb_logger=None, wandb_logger=None):
        self.opt = opt
        self.seed = opt['seed']
        self.jobs = opt['jobs']
        self.results_dir = opt['path']['results']
        self.tb_logger = tb_logger
        self.wandb_logger = wandb_logger
        self.tables = OrderedDict()
        self.log_dict = OrderedDict()
        self.check_logger = logging.getLogger('check')

    def run(self):
        pass

    def check(self):
        return []

    def get_current_log(self):
        return self.log_dict

    def save_table(self, name, frame, plot=None, extra=None):
        '''CSV under results/, plus its plot script when plot kwargs are given'''
        self.tables[name] = frame
        csv_name = name + '.csv'
        Writer.write_csv(os.path.join(self.results_dir, csv_name), frame, self.opt, extra)
        if plot is not None:
            Writer.write_plot_script(self.results_dir, csv_name, **plot)
        if self.wandb_logger:
            self.wandb_logger.log_table(name, frame)
        return frame

    def log_scalar(self, tag, value, step=0):
        self.log_dict[tag] = value
        if self.tb_logger is not None:
            self.tb_logger.add_scalar(tag, value, step)
        if self.wandb_logger:
            self.wandb_logger.log_metrics({tag: value})

    def expect(self, failures, ok, message):
        '''record one acceptance check'''
        if ok:
            self.check_logger.info('PASS {}'.format(message))
        else:
            self.check_logger.warning('FAIL {}'.format(message))
            failures.append(message)
        return ok

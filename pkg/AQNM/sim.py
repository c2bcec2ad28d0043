import sys
import argparse
import logging

from tensorboardX import SummaryWriter

import core.logger as Logger
import model as Model
from core.errors import CheckFailed, ConfigError, SimulationError
from core.options import PRESETS
from core.wandb_logger import WandbLogger


def build_parser():
    parser = argparse.ArgumentParser(description='Low-resolution converter beamforming simulator')
    parser.add_argument('-c', '--config', type=str, default=None,
                        help='JSON file for configuration (// comments allowed)')
    parser.add_argument('--preset', type=str, choices=PRESETS, default=None,
                        help='experiment to run; overrides the config')
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--jobs', type=int, default=None, help='worker processes')
    parser.add_argument('--out', type=str, default=None, help='root of the run directory')
    parser.add_argument('--no-timestamp', dest='no_timestamp', action='store_true',
                        help='no timestamp in the run directory or the CSV headers')
    parser.add_argument('--check', action='store_true', help='exit with 3 if an acceptance check fails')
    parser.add_argument('-o', '--override', action='append', default=[],
                        help='key.path=value, repeatable')
    parser.add_argument('--bits', type=str, default=None, help='resolutions of the preset sweep, e.g. 2,3,4,inf')
    parser.add_argument('--snr', type=str, default=None, help='SNR axis of the preset sweep, a:b[:step] or a,b,c')
    parser.add_argument('-debug', '-d', action='store_true')
    parser.add_argument('-enable_wandb', action='store_true')
    return parser


def run(args):
    opt = Logger.parse(args)
    # Convert to NoneDict, which return None for missing key.
    opt = Logger.dict_to_nonedict(opt)

    # logging
    Logger.setup_logger(None, opt['path']['log'], 'run', level=logging.INFO, screen=True)
    Logger.setup_logger('check', opt['path']['log'], 'check', level=logging.INFO)
    logger = logging.getLogger('base')
    logger.info(Logger.dict2str(opt))
    tb_logger = SummaryWriter(log_dir=opt['path']['tb_logger'])

    # Initialize WandbLogger
    wandb_logger = WandbLogger(opt) if opt['enable_wandb'] else None

    experiment = Model.create_model(opt, tb_logger, wandb_logger)
    logger.info('Begin [{:s}] with seed {}.'.format(opt['preset'], opt['seed']))
    try:
        experiment.run()
        failures = experiment.check()
    finally:
        tb_logger.close()
        if wandb_logger:
            wandb_logger.finish()
    logger.info('End of [{:s}]; results in {:s}'.format(opt['preset'], opt['path']['results']))
    if failures:
        logger.warning('{:d} acceptance check(s) failed, see check.log'.format(len(failures)))
        if opt['check']:
            raise CheckFailed(failures)
    return experiment


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return e.exit_code
    except SimulationError as e:
        logging.getLogger('base').error(str(e))
        print(str(e), file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())

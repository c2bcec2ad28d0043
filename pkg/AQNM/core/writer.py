'''
Result files: CSVs carrying the resolved configuration as '# ' header lines,
and standalone matplotlib scripts that plot them.
'''
import os
import json
import logging

import pandas as pd

from core.logger import get_timestamp

logger = logging.getLogger('base')

# run-local settings that do not change any result
RUN_LOCAL_KEYS = ('jobs', 'path', 'check', 'enable_wandb')


def header_config(opt):
    return {k: v for k, v in opt.items() if k not in RUN_LOCAL_KEYS}


def header_lines(opt, extra=None):
    lines = ['config: ' + json.dumps(header_config(opt), sort_keys=False, default=str),
             'seed: {}'.format(opt['seed'])]
    for k, v in (extra or {}).items():
        lines.append('{}: {}'.format(k, v))
    if opt['output']['timestamp']:
        lines.append('generated: {}'.format(get_timestamp()))
    return ['# ' + line for line in lines]


def write_csv(path, frame, opt, extra=None):
    '''write a DataFrame (or a list of row dicts) under a config header'''
    if not isinstance(frame, pd.DataFrame):
        frame = pd.DataFrame(frame)
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', newline='') as f:
        f.write('\n'.join(header_lines(opt, extra)) + '\n')
        frame.to_csv(f, index=False, float_format='%.10g', lineterminator='\n')
    logger.info('Saved {:d} rows to {:s}'.format(len(frame), path))
    return path


def read_csv(path):
    return pd.read_csv(path, comment='#')


PLOT_TEMPLATE = '''\
# plots {csv} ; usage: python {script}
import os
import pandas as pd
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
df = pd.read_csv(os.path.join(here, '{csv}'), comment='#')
fig, ax = plt.subplots(figsize=(6, 4))
{body}
ax.set_xlabel('{xlabel}')
ax.set_ylabel('{ylabel}')
ax.grid(True, alpha=0.3)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(here, '{png}'), dpi=150)
'''

LINE_BODY = '''\
for key, g in df.groupby({group!r}):
    ax.plot(g[{x!r}], g[{y!r}], {style!r}, label='{label} ' + str(key))
'''

CDF_BODY = '''\
for key, g in df.groupby({group!r}):
    v = g[{x!r}].dropna().sort_values()
    ax.step(v, [(i + 1) / len(v) for i in range(len(v))], where='post', label='{label} ' + str(key))
'''


def write_plot_script(results_dir, csv_name, x, y, group, xlabel, ylabel, label='',
                      kind='line', style='-o', extra_body=''):
    '''emit <csv stem>_plot.py next to the CSV; plotting is not imported here'''
    stem = os.path.splitext(csv_name)[0]
    script = stem + '_plot.py'
    if kind == 'cdf':
        body = CDF_BODY.format(group=group, x=x, label=label)
    else:
        body = LINE_BODY.format(group=group, x=x, y=y, style=style, label=label)
    text = PLOT_TEMPLATE.format(csv=csv_name, script=script, body=body + extra_body,
                                xlabel=xlabel, ylabel=ylabel, png=stem + '.png')
    path = os.path.join(results_dir, script)
    with open(path, 'w') as f:
        f.write(text)
    return path

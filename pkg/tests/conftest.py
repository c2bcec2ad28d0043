import os
import sys

import pytest

# the simulator modules import each other from the AQNM root
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'AQNM'))

from model.network_modules.layout import NetworkConfig  # noqa: E402


@pytest.fixture
def small_network():
    '''a few cells, a few UEs and a short horizon'''
    def build(**kwargs):
        base = dict(area_m=600.0, cell_radius_m=100.0, mean_ues_per_cell=4.0, ue_drop='fixed',
                    n_ttis=20, bs_array=(4, 4), ue_array=(2, 2), seed=3)
        base.update(kwargs)
        return NetworkConfig(**base)
    return build

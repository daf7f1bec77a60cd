from .accounting import (EnergyPricer, channel_capacity, co2_proxy, comm_energy, compute_energy_proxy,
                         energy_per_bit)
from .flops import forward_flops, training_flops

__all__ = ['EnergyPricer', 'channel_capacity', 'co2_proxy', 'comm_energy', 'compute_energy_proxy',
           'energy_per_bit', 'forward_flops', 'training_flops']

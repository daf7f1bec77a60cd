from .bpsk import demodulate_bpsk, modulate_bpsk
from .fading import NO_FADING, draw_fading, draw_rayleigh, draw_rayleigh_many
from .theory import ber_awgn_bpsk, ber_rayleigh_bpsk, q_function
from .wireless import LinkLedger, WirelessLink, estimate_ber, transmit

__all__ = ['demodulate_bpsk', 'modulate_bpsk', 'NO_FADING', 'draw_fading', 'draw_rayleigh', 'draw_rayleigh_many',
           'ber_awgn_bpsk', 'ber_rayleigh_bpsk', 'q_function', 'LinkLedger', 'WirelessLink', 'estimate_ber',
           'transmit']

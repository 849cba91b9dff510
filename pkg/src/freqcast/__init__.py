"""freqcast: frequency-domain time-series forecasting engine.

Pipeline: scalar embedding -> windowed real FFT analysis -> top-M spectral
compression -> a complex or hyper-complex window-mixing layer -> position
aware padding -> overlap-add synthesis -> skip connection -> per-channel
two-layer read-out head.  Everything trains with the package's own
reverse-mode differentiation over plain float64 arrays.
"""

__version__ = "0.1.0"

"""Versioned threshold values produced by this package's own bisection.

Bisection is deterministic, so recomputing with the recorded settings must
reproduce these floats exactly. Regenerate with::

    python -m delaypress threshold --beta-grid 1,2,5,10,50 --steps-per-delay 200
    python -m delaypress threshold --beta-grid 1,2,5,10,50 --steps-per-delay 80
"""

GOLDEN_VERSION = 1
TOL = 1e-4
HORIZON = 500.0

# steps_per_delay = 200: default analysis resolution
G_N200 = {
    1.0: 0.3685800170898438,
    2.0: 0.6612673950195314,
    5.0: 0.8312758178710937,
    10.0: 0.9068080444335938,
    50.0: 0.9778327026367188,
}

# steps_per_delay = 80 = tau/dt for tau = 40, dt = 0.5 (press-table grid)
G_N80 = {
    1.0: 0.3671181030273438,
    2.0: 0.6587699584960938,
    5.0: 0.8281083374023437,
    10.0: 0.9033359985351563,
    50.0: 0.9736906127929688,
}

import math

import numpy as np

from polcascade.transmission.cascade import Normalization, curve, triple_transmission
from polcascade.transmission.core import qm_triple
from polcascade.transmission.util import TransmissionCommand

HEADER = ("alpha_deg", "hv_norm", "qm")


class Command(TransmissionCommand):
    help = "Transmission through three polarizers as a function of the middle one"

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument(
            "--beta", type=float, help="Angle of the third polarizer in degrees"
        )

    def run(self, cfg):
        p = cfg.profile
        beta_deg = cfg.get("beta", default=0.0)
        beta = math.radians(beta_deg)
        hv = curve(
            lambda a: triple_transmission(p, a, beta, cfg.spec),
            cfg.grid,
            Normalization.RAW,
        ).values
        if cfg.normalization is Normalization.UNIT_AT_ZERO:
            # relative to the fully aligned cascade, like the qm column
            hv = hv / triple_transmission(p, 0.0, 0.0, cfg.spec)
        elif cfg.normalization is Normalization.INCIDENT_DENSITY:
            hv = hv / math.pi
        rows = zip(np.rad2deg(cfg.grid), hv, qm_triple(cfg.grid, beta))
        self.write_table(cfg, HEADER, list(rows), beta_deg=beta_deg)

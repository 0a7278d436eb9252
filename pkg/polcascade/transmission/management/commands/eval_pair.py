import numpy as np

from polcascade.transmission.cascade import (
    belifante_pair_raw,
    curve,
    pair_transmission_raw,
    simple_output_distribution,
)
from polcascade.transmission.core import (
    HALF_PI,
    MalusTarget,
    ModelDomainError,
    angular_distance,
    belifante_profile,
    malus,
    p1,
)
from polcascade.transmission.util import TransmissionCommand, config_error

HEADER = ("alpha_deg", "p1", "p2_norm", "d", "malus")


class Command(TransmissionCommand):
    help = "Transmission through a polarizer pair next to the Malus law"
    needs_zero = True

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument(
            "--profile",
            choices=("model", "belifante"),
            help="Use the fitted p1 profile (default) or the cos^2 profile",
        )
        parser.add_argument(
            "--eps-leak", type=float, help="Leakage of the Malus reference"
        )

    def run(self, cfg):
        grid = cfg.grid
        try:
            target = MalusTarget(eps_leak=cfg.get("eps_leak", default=0.0))
        except ModelDomainError as e:
            raise config_error(str(e))
        delta = angular_distance(grid, 0.0)
        if cfg.options.get("profile") == "belifante":
            single = belifante_profile(delta)
            pair = curve(lambda a: belifante_pair_raw(a, cfg.spec), grid, cfg.normalization)
            d = single / HALF_PI
        else:
            p = cfg.profile
            single = p1(delta, p)
            pair = curve(
                lambda a: pair_transmission_raw(p, a, cfg.spec), grid, cfg.normalization
            )
            d = simple_output_distribution(p, grid)

        rows = zip(
            np.rad2deg(grid), single, pair.values, d, malus(grid, target)
        )
        self.write_table(cfg, HEADER, list(rows))

import numpy as np

from polcascade.transmission.cascade import curve
from polcascade.transmission.core import MalusTarget, angular_distance, malus, p1
from polcascade.transmission.shrinkage import TotalsConvention
from polcascade.transmission.util import (
    TransmissionCommand,
    config_error,
    shrinkage_model,
)

HEADER = ("alpha_deg", "p1", "p2_norm", "d", "malus")


class Command(TransmissionCommand):
    help = "Transmission through a polarizer pair in the shrinkage model"
    default_preset = "fig2-shrinkage"
    needs_zero = True

    def run(self, cfg):
        if cfg.shrinkage is None:
            raise config_error("eval-shrinkage needs sigma, eps_shift and eta")
        grid = cfg.grid
        model = shrinkage_model(cfg)

        pair = curve(model.pair_transmission, grid, cfg.normalization)
        d = model.output_distribution(grid)
        rows = zip(
            np.rad2deg(grid),
            p1(angular_distance(grid, 0.0), cfg.profile),
            pair.values,
            d,
            malus(grid, MalusTarget()),
        )

        totals = {}
        for convention in TotalsConvention:
            i1, i2 = model.total_ratios(convention)
            totals[convention.value] = {"I1_over_I0": i1, "I2_over_I0": i2}

        if cfg.format == "json":
            self.write_table(cfg, HEADER, list(rows), totals=totals)
        else:
            self.write_table(cfg, HEADER, list(rows))
            self.write_side_record(
                cfg,
                {
                    "schema": 1,
                    "command": cfg.command,
                    "params": cfg.parameter_record(),
                    "totals": totals,
                },
                ".totals.json",
            )

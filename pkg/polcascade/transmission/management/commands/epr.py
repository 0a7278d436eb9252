import math

from polcascade.transmission.epr import (
    CHSH_LOCAL_BOUND,
    AnalyzerSettings,
    bound_respected,
    chsh,
    chsh_scan,
    qm_chsh,
    qm_chsh_scan,
)
from polcascade.transmission.util import TransmissionCommand, angle_list, config_error


class Command(TransmissionCommand):
    help = "CHSH quantity of photon pairs with a shared hidden polarization"
    default_format = "json"
    formats = ("json",)

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument(
            "--reference",
            choices=("hv", "qm"),
            help="Hidden-variable model (default) or the quantum reference",
        )
        parser.add_argument(
            "--settings-deg",
            type=angle_list,
            help="Evaluate at a,a',b,b' (degrees) instead of scanning",
        )
        parser.add_argument("--step", type=float, help="Scan step in degrees")
        parser.add_argument(
            "--perpendicular",
            action="store_true",
            default=None,
            help="Source emits crossed instead of parallel pairs",
        )

    def run(self, cfg):
        qm = cfg.get("reference", default="hv") == "qm"
        perpendicular = bool(cfg.get("perpendicular", default=False))
        doc = {
            "schema": 1,
            "model": qm and "qm" or "hv",
        }

        angles = cfg.get("settings_deg")
        if angles is not None:
            settings = AnalyzerSettings(*(math.radians(v) for v in angles))
            if qm:
                s = qm_chsh(settings, perpendicular)
            else:
                s = chsh(cfg.profile, settings, cfg.spec, perpendicular)
            mode = "settings"
        else:
            step_deg = cfg.get("step", "CHSH_DEFAULT_STEP_DEG", 7.5)
            if not 0 < step_deg <= 22.5:
                raise config_error("--step must be in (0, 22.5] degrees")
            if qm:
                s, settings = qm_chsh_scan(math.radians(step_deg), perpendicular)
            else:
                s, settings = chsh_scan(
                    cfg.profile, math.radians(step_deg), cfg.spec, perpendicular
                )
            mode = "scan"
            doc["step_deg"] = step_deg

        doc["settings"] = settings.as_degrees()
        doc["S"] = s
        doc["bound_respected"] = bound_respected(s)
        doc["bound"] = CHSH_LOCAL_BOUND
        doc["mode"] = mode
        doc["perpendicular"] = perpendicular
        if not qm:
            doc["params"] = cfg.parameter_record()
        self.write_document(cfg, doc)

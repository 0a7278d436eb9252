from django.conf import settings

import logging

from polcascade.transmission.core import MalusTarget, ModelDomainError
from polcascade.transmission.fitting import (
    FitModel,
    FitProblem,
    minimize,
    report_document,
    residual_report,
)
from polcascade.transmission.util import (
    TransmissionCommand,
    config_error,
    nonnegative_int,
    positive_int,
)

log = logging.getLogger(__name__)


class Command(TransmissionCommand):
    help = "Fit profile parameters to the Malus law"
    default_format = "json"

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument("--model", choices=[m.value for m in FitModel])
        parser.add_argument("--starts", type=positive_int)
        parser.add_argument("--seed", type=nonnegative_int)
        parser.add_argument("--maxiter", type=positive_int)
        parser.add_argument("--eps-leak", type=float)

    def natural_preset(self, options):
        return FitModel(options.get("model") or "simple").preset

    def run(self, cfg):
        model = FitModel(cfg.options.get("model") or "simple")
        if model is FitModel.SHRINKAGE and cfg.shrinkage is None:
            raise config_error("A shrinkage fit needs sigma, eps_shift and eta")

        try:
            problem = FitProblem(
                model=model,
                grid=cfg.grid,
                target=MalusTarget(eps_leak=cfg.get("eps_leak", default=0.0)),
                start=tuple(cfg.params[k] for k in model.parameter_names),
            )
        except ModelDomainError as e:
            raise config_error(str(e))

        result = minimize(
            problem,
            cfg.spec,
            starts=cfg.get("starts", "FIT_DEFAULT_STARTS", 20),
            seed=cfg.get("seed", "FIT_DEFAULT_SEED", 1),
            maxiter=cfg.get("maxiter", "FIT_MAXITER", 5000),
            spread=getattr(settings, "FIT_START_SPREAD", 0.3),
        )
        if not result.converged:
            log.warning("Fit did not converge, reporting the best parameters found")

        if cfg.format == "csv":
            rows = [
                (r["alpha_deg"], r["model"], r["target"], r["residual"])
                for r in residual_report(result, problem)
            ]
            self.write_table(cfg, ("alpha_deg", "model", "target", "residual"), rows)
        else:
            self.write_document(cfg, report_document(result, problem))

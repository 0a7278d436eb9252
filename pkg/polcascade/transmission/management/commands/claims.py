from polcascade.transmission.claims import ClaimOptions, evaluate_claims, report_document
from polcascade.transmission.util import (
    TransmissionCommand,
    nonnegative_int,
    positive_int,
)


def claim_ids(text):
    return [positive_int(v) for v in str(text).split(",")]


class Command(TransmissionCommand):
    help = "Evaluate the headline claims of the model and report the verdicts"
    default_format = "json"
    formats = ("json",)

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument("--only", type=claim_ids, help="Comma separated claim ids")
        parser.add_argument("--starts", type=positive_int)
        parser.add_argument("--maxiter", type=positive_int)
        parser.add_argument("--samples", type=positive_int)
        parser.add_argument("--streams", type=positive_int)
        parser.add_argument("--configurations", type=positive_int)
        parser.add_argument("--seed", type=nonnegative_int)

    def run(self, cfg):
        opts = ClaimOptions(
            spec=cfg.spec,
            starts=cfg.get("starts", "FIT_DEFAULT_STARTS", 20),
            seed=cfg.get("seed", "MC_DEFAULT_SEED", 1),
            maxiter=cfg.get("maxiter", "FIT_MAXITER", 5000),
            samples=cfg.get("samples", "MC_DEFAULT_SAMPLES", 1000000),
            streams=cfg.get("streams", "MC_DEFAULT_STREAMS", 4),
            configurations=cfg.get("configurations", default=10),
            only=cfg.get("only"),
        )
        self.write_document(cfg, report_document(evaluate_claims(opts)))

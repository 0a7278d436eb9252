from django.conf import settings

import math

from polcascade.transmission.cascade import pair_transmission_raw, triple_transmission
from polcascade.transmission.core import ModelDomainError
from polcascade.transmission.epr import coincidence_rate
from polcascade.transmission.montecarlo import (
    McConfig,
    mc_coincidence,
    mc_pair,
    mc_pair_shrinkage,
    mc_triple,
)
from polcascade.transmission.util import (
    TransmissionCommand,
    config_error,
    nonnegative_int,
    positive_int,
    shrinkage_model,
)

QUANTITIES = ("pair", "triple", "shrinkage-pair", "coincidence")


class Command(TransmissionCommand):
    help = "Monte Carlo estimate of a transmission probability"
    default_format = "json"
    formats = ("json",)

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument("--quantity", choices=QUANTITIES)
        parser.add_argument("--alpha", type=float, help="Degrees")
        parser.add_argument("--beta", type=float, help="Degrees")
        parser.add_argument("--samples", type=positive_int)
        parser.add_argument("--seed", type=nonnegative_int)
        parser.add_argument("--streams", type=positive_int)
        parser.add_argument(
            "--check",
            action="store_true",
            default=None,
            help="Also compute the quadrature value and the 4 sigma verdict",
        )

    def natural_preset(self, options):
        if options.get("quantity") == "shrinkage-pair":
            return "fig2-shrinkage"
        return self.default_preset

    def run(self, cfg):
        quantity = cfg.get("quantity", default="pair")
        alpha_deg = cfg.get("alpha", default=0.0)
        beta_deg = cfg.get("beta", default=0.0)
        alpha = math.radians(alpha_deg)
        beta = math.radians(beta_deg)
        seed = cfg.get("seed", "MC_DEFAULT_SEED", 1)
        streams = cfg.get("streams", "MC_DEFAULT_STREAMS", 4)
        try:
            mc = McConfig(
                samples=cfg.get("samples", "MC_DEFAULT_SAMPLES", 1000000),
                seed=seed,
                stream_count=streams,
            )
        except ModelDomainError as e:
            raise config_error(str(e))
        p = cfg.profile

        if quantity == "pair":
            est = mc_pair(p, alpha, mc)
        elif quantity == "triple":
            est = mc_triple(p, alpha, beta, mc)
        elif quantity == "coincidence":
            est = mc_coincidence(p, alpha, beta, mc)
        else:
            if cfg.shrinkage is None:
                raise config_error("shrinkage-pair needs sigma, eps_shift and eta")
            est = mc_pair_shrinkage(
                p,
                cfg.shrinkage,
                alpha,
                mc,
                cfg.spec,
                bins=getattr(settings, "MC_TABLE_BINS", 4096),
            )

        doc = {
            "schema": 1,
            "quantity": quantity,
            "params": cfg.parameter_record(),
            "alpha_deg": alpha_deg,
            "beta_deg": beta_deg,
            **est.as_dict(),
            "seed": seed,
            "streams": streams,
        }
        if cfg.get("check", default=False):
            value = self.quadrature(cfg, quantity, alpha, beta)
            doc["quadrature"] = value
            doc["agrees"] = est.agrees_with(value)
        self.write_document(cfg, doc)

    def quadrature(self, cfg, quantity, alpha, beta):
        p = cfg.profile
        if quantity == "pair":
            return pair_transmission_raw(p, alpha, cfg.spec) / math.pi
        if quantity == "triple":
            return triple_transmission(p, alpha, beta, cfg.spec) / math.pi
        if quantity == "coincidence":
            return coincidence_rate(p, alpha, beta, cfg.spec)
        return shrinkage_model(cfg).pair_transmission(alpha) / math.pi

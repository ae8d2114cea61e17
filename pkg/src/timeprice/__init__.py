"""Revenue-optimal pricing for buyers who trade money against time."""

from .discretizer import Certificate, DiscretizationResult, certified_solve, discretize
from .errors import (DegenerateSegmentError, InvalidInstanceError, InvalidLineError,
                     NumericalFailure, OracleCapExceeded)
from .geometry import ThetaWindow, cross, mass_above, segment_through, validate_chain
from .instances import (BandClosedForm, gen_band, gen_kstep_tight, gen_loss_tight,
                        gen_product, kstep_tight_line)
from .model import (BestAction, BuyerType, ContinuousDistribution, Decision,
                    DiscreteTypeDistribution, PricingFunction, Report, Segment,
                    SeparationLine, Verdict, best_response, buyer_decision,
                    evaluate_continuous, evaluate_discrete, pricing_from_separation,
                    separation_from_pricing, validate_instance)
from .solver import (CandidateSegment, SolveResult, brute_force_optimal, solve_kstep,
                     solve_optimal, solve_posted)

__version__ = "0.1.0"

"""Energy-efficient UAV multicasting over a simultaneous FSO backhaul and power link."""

__version__ = "0.1.0"

from .params import (EnvironmentParams, FsoLinkParams, GeometryParams, RfLinkParams,  # noqa: E402
                     Scenario, ScenarioError, load_scenario)
from .channel import a2g_gain, avg_rate, elevation_angle_deg, los_probability, rate_lower_bound  # noqa: E402
from .quadrature import QuadratureError, QuadratureSpec  # noqa: E402
from .edge_rate import (EdgeRateResult, InfeasibleCoverage, edge_cdf, edge_pdf, edge_rate,  # noqa: E402
                        mission_time)
from .fso import (FsoLinkState, FsoOperatingPoint, backhaul_distance, backhaul_rate,  # noqa: E402
                  fbr_satisfied, fph_satisfied, fso_gain)
from .optimizer import (DesignVariables, QFactors, SolutionReport, auxiliary_altitudes,  # noqa: E402
                        ee_u_exact, ee_u_tilde, inner_power_derivative, optimal_fso,
                        optimal_power_at_altitude, solve)

#include "asl/error.hpp"

namespace asl {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::non_convergence: return "NonConvergence";
    case Errc::not_primitive: return "NotPrimitive";
    case Errc::topology_invalid: return "TopologyInvalid";
    case Errc::eigenvector_incompatible: return "EigenvectorIncompatible";
    case Errc::support_violation: return "SupportViolation";
    case Errc::divergent: return "Divergent";
    case Errc::root_not_bracketed: return "RootNotBracketed";
    case Errc::integration_failure: return "IntegrationFailure";
    case Errc::no_negative_root: return "NoNegativeRoot";
    case Errc::no_conflicting_agents: return "NoConflictingAgents";
    case Errc::conflicting_agents_present: return "ConflictingAgentsPresent";
    case Errc::degenerate_variance: return "DegenerateVariance";
    case Errc::domain_error: return "DomainError";
    case Errc::not_reached: return "NotReached";
    case Errc::invalid_config: return "InvalidConfig";
  }
  return "UnknownError";
}

}  // namespace asl

#include "types.hpp"

namespace contdef {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::ok: return "Ok";
    case Errc::degenerate_simplex: return "DegenerateSimplex";
    case Errc::off_hyperplane: return "OffHyperplane";
    case Errc::invalid_feature: return "InvalidFeature";
    case Errc::singular_transform: return "SingularTransform";
    case Errc::orientation_reversing: return "OrientationReversing";
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::containment_violated: return "ContainmentViolated";
    case Errc::unreachable: return "Unreachable";
    case Errc::singular_weight_system: return "SingularWeightSystem";
    case Errc::missing_neighbor: return "MissingNeighbor";
    case Errc::singular_linearization: return "SingularLinearization";
    case Errc::guard_tripped: return "GuardTripped";
    case Errc::input_saturated: return "InputSaturated";
    case Errc::angles_not_constant: return "AnglesNotConstant";
    case Errc::too_dense: return "TooDense";
    case Errc::out_of_segment: return "OutOfSegment";
    case Errc::no_path: return "NoPath";
    case Errc::invalid_endpoint: return "InvalidEndpoint";
    case Errc::infeasible_segment: return "InfeasibleSegment";
    case Errc::parse_error: return "ParseError";
    case Errc::schema_error: return "SchemaError";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace contdef

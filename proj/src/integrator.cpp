#include "dsvm/integrator.hpp"

namespace dsvm {

StepMethod parse_step_method(std::string_view name) {
  if (name == "euler") return StepMethod::euler;
  if (name == "rk4") return StepMethod::rk4;
  throw InvalidParam("method: unknown integrator '" + std::string(name) + "'");
}

std::string_view to_string(StepMethod method) {
  return method == StepMethod::euler ? "euler" : "rk4";
}

std::string_view to_string(StopReason reason) {
  return reason == StopReason::converged ? "Converged" : "MaxSteps";
}

void FlowConfig::validate() const {
  if (!(step_size > 0.0)) throw InvalidParam("step_size must be > 0");
  if (max_steps < 1) throw InvalidParam("max_steps must be >= 1");
  if (!(stop_tol > 0.0)) throw InvalidParam("stop_tol must be > 0");
  if (record_every < 1) throw InvalidParam("record_every must be >= 1");
  if (init.kind == InitSpec::Kind::seeded_random && !(init.scale > 0.0)) {
    throw InvalidParam("init.scale must be > 0");
  }
}

}  // namespace dsvm

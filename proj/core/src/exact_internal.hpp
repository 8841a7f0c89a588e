#pragma once

#include "relaysim/engine.hpp"

// Quadrature-based enumeration for small known-CSI instances, shared by the
// campaign pipeline and the exact-BER oracle so that both routes see the
// same side information.
namespace relaysim::detail {

// All fan-ins at most 2, known CSI: every per-node decision probability is
// computable by 1-D adaptive quadrature.
bool enumerable_csi(const SimConfig& config);

PmfPipeline build_pipeline_exact(const SimConfig& config,
                                 const NetworkTopology& topology);

double exact_ber_impl(const SimConfig& config,
                      const NetworkTopology& topology,
                      const PmfPipeline& pipeline);

}  // namespace relaysim::detail

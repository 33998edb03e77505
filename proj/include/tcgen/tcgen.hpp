#pragma once

#include "error.hpp"
#include "random.hpp"
#include "sequences.hpp"
#include "graph.hpp"
#include "graphability.hpp"
#include "assembler.hpp"
#include "transition.hpp"
#include "lifecycle.hpp"
#include "metrics.hpp"
#include "io.hpp"
#include "pipeline.hpp"

namespace tcgen {

inline constexpr const char* version = "0.1.0";

} // namespace tcgen

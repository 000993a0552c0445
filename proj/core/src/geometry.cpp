#include "migsim/geometry.hpp"

// Geometry is header-only; this TU anchors the target.
namespace migsim {}

#pragma once

// Quad-precision scalar for the templated kernels. Consumers link quadmath
// (target dalign_quad) and build with GNU extensions enabled.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

namespace dalign {

using Quad = boost::multiprecision::float128;

}  // namespace dalign

// SPDX-License-Identifier: Apache-2.0
//
// Expected number of real zeros of F(t;x) = f0(t) + sum_i x_i f_i(t) on an
// interval, for random parameter vectors x: analytic local densities with
// closed forms for trigonometric and Kac families, plus a Monte Carlo
// root-counting oracle that cross-checks every formula.
#pragma once

#include "rzero/density.hpp"
#include "rzero/envelope.hpp"
#include "rzero/errors.hpp"
#include "rzero/expectation.hpp"
#include "rzero/family.hpp"
#include "rzero/jet.hpp"
#include "rzero/json_io.hpp"
#include "rzero/mc_oracle.hpp"
#include "rzero/quadrature.hpp"
#include "rzero/rng.hpp"
#include "rzero/special.hpp"
#include "rzero/zero_density.hpp"

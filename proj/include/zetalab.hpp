#pragma once

#include "zetalab/core/precision.hpp"
#include "zetalab/core/complex.hpp"
#include "zetalab/core/bernoulli.hpp"
#include "zetalab/core/quadrature.hpp"
#include "zetalab/core/parallel.hpp"
#include "zetalab/sieve.hpp"
#include "zetalab/zeta.hpp"
#include "zetalab/dirichlet.hpp"
#include "zetalab/contours.hpp"
#include "zetalab/roots.hpp"
#include "zetalab/experiments.hpp"
#include "zetalab/report.hpp"

#pragma once

#include "cfa/approx.hpp"
#include "cfa/convolution.hpp"
#include "cfa/direct_sum.hpp"
#include "cfa/errors.hpp"
#include "cfa/exponent.hpp"
#include "cfa/extraction.hpp"
#include "cfa/finite_fn.hpp"
#include "cfa/gliding_hump.hpp"
#include "cfa/grid_function.hpp"
#include "cfa/io.hpp"
#include "cfa/mollifier.hpp"
#include "cfa/operator_family.hpp"
#include "cfa/quotient_class.hpp"
#include "cfa/scenario.hpp"
#include "cfa/selection.hpp"

#pragma once

#include "bigint.hpp"
#include "discrete_space.hpp"
#include "errors.hpp"
#include "gf2.hpp"
#include "poly_constraints.hpp"
#include "poly_decompose.hpp"
#include "ratpoly.hpp"
#include "tenn.hpp"
#include "tree.hpp"
#include "tree_metric.hpp"

#pragma once

#include "fexpo/error.hpp"
#include "fexpo/graph.hpp"
#include "fexpo/dsl.hpp"
#include "fexpo/expr.hpp"
#include "fexpo/exponent.hpp"
#include "fexpo/chaos.hpp"
#include "fexpo/moments.hpp"
#include "fexpo/rewrite.hpp"
#include "fexpo/beta.hpp"
#include "fexpo/rng.hpp"
#include "fexpo/parallel.hpp"
#include "fexpo/fbm.hpp"
#include "fexpo/sde.hpp"
#include "fexpo/expansion.hpp"
#include "fexpo/regression.hpp"

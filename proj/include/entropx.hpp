#pragma once

#include "entropx/core.hpp"
#include "entropx/estimator.hpp"
#include "entropx/explicit_distribution.hpp"
#include "entropx/families.hpp"
#include "entropx/bounds.hpp"
#include "entropx/cnf.hpp"
#include "entropx/counter.hpp"
#include "entropx/sampler.hpp"
#include "entropx/formula.hpp"
#include "entropx/circuits.hpp"
#include "entropx/io.hpp"
#include "entropx/bench.hpp"

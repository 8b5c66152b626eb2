#pragma once

#include "covax/bench.hpp"
#include "covax/evaluator.hpp"
#include "covax/generate.hpp"
#include "covax/genome.hpp"
#include "covax/greedy.hpp"
#include "covax/instance.hpp"
#include "covax/moea/dominance.hpp"
#include "covax/moea/gsemo.hpp"
#include "covax/moea/mu_plus_one.hpp"
#include "covax/moea/nsga2.hpp"
#include "covax/moea/operators.hpp"
#include "covax/moea/run.hpp"
#include "covax/moea/warm_start.hpp"
#include "covax/oracle.hpp"
#include "covax/rng.hpp"
#include "covax/similarity.hpp"

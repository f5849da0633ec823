#pragma once

#include "renyi_bvn/csv.hpp"
#include "renyi_bvn/estimator.hpp"
#include "renyi_bvn/influence.hpp"
#include "renyi_bvn/linalg.hpp"
#include "renyi_bvn/model.hpp"
#include "renyi_bvn/montecarlo.hpp"
#include "renyi_bvn/rng.hpp"
#include "renyi_bvn/sample.hpp"
#include "renyi_bvn/special.hpp"
#include "renyi_bvn/wald.hpp"

#pragma once

#include "liftmix/conductance.hpp"
#include "liftmix/constructions.hpp"
#include "liftmix/distribution.hpp"
#include "liftmix/error.hpp"
#include "liftmix/graph.hpp"
#include "liftmix/lift.hpp"
#include "liftmix/lp.hpp"
#include "liftmix/markov.hpp"
#include "liftmix/random.hpp"
#include "liftmix/scenario.hpp"

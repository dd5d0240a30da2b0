#pragma once

#include "nexus/error.hpp"
#include "nexus/model.hpp"
#include "nexus/random.hpp"
#include "nexus/sampler.hpp"
#include "nexus/simulation.hpp"
#include "nexus/posterior.hpp"
#include "nexus/evaluation.hpp"
#include "nexus/io.hpp"

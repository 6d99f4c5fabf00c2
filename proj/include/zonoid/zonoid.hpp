#pragma once

#include "zonoid/algebra.hpp"
#include "zonoid/config.hpp"
#include "zonoid/error.hpp"
#include "zonoid/exterior.hpp"
#include "zonoid/finsler.hpp"
#include "zonoid/manifold.hpp"
#include "zonoid/parallel.hpp"
#include "zonoid/random_field.hpp"
#include "zonoid/rng.hpp"
#include "zonoid/section.hpp"
#include "zonoid/simulator.hpp"
#include "zonoid/zonotope.hpp"

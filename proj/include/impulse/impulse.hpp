#pragma once

#include "impulse/bifurcation.hpp"
#include "impulse/cycle.hpp"
#include "impulse/design.hpp"
#include "impulse/feasibility.hpp"
#include "impulse/model.hpp"
#include "impulse/modulation.hpp"
#include "impulse/sim.hpp"

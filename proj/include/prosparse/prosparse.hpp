#pragma once

// Umbrella header for the prosparse library.

#include "prosparse/bit_vector.hpp"
#include "prosparse/cost_model.hpp"
#include "prosparse/cycle_sim.hpp"
#include "prosparse/detector.hpp"
#include "prosparse/dispatcher.hpp"
#include "prosparse/errors.hpp"
#include "prosparse/io.hpp"
#include "prosparse/manifest.hpp"
#include "prosparse/metrics.hpp"
#include "prosparse/oracle.hpp"
#include "prosparse/processor.hpp"
#include "prosparse/pruner.hpp"
#include "prosparse/reference_gemm.hpp"
#include "prosparse/spike_matrix.hpp"
#include "prosparse/synth.hpp"
#include "prosparse/tiling.hpp"

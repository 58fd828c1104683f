#pragma once

#include "htr/bits.hpp"
#include "htr/causal.hpp"
#include "htr/circuit.hpp"
#include "htr/error.hpp"
#include "htr/infoflow.hpp"
#include "htr/instance.hpp"
#include "htr/rng.hpp"
#include "htr/sequential.hpp"

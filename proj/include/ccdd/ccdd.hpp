#pragma once

// Umbrella header.

#include "ccdd/compiler.hpp"
#include "ccdd/counter.hpp"
#include "ccdd/diagram.hpp"
#include "ccdd/equivalence.hpp"
#include "ccdd/formula.hpp"
#include "ccdd/oracle.hpp"
#include "ccdd/ordering.hpp"
#include "ccdd/queries.hpp"
#include "ccdd/sampler.hpp"

#pragma once

#include "specdesign/error.hpp"
#include "specdesign/linalg.hpp"
#include "specdesign/waterfill.hpp"
#include "specdesign/criteria.hpp"
#include "specdesign/construct.hpp"
#include "specdesign/designer.hpp"
#include "specdesign/dfo.hpp"
#include "specdesign/bench.hpp"

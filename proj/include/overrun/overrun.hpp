#pragma once

#include "overrun/types.hpp"
#include "overrun/cost_model.hpp"
#include "overrun/attribution.hpp"
#include "overrun/financing.hpp"
#include "overrun/contracts.hpp"
#include "overrun/scenario.hpp"
#include "overrun/calibration.hpp"
#include "overrun/io.hpp"

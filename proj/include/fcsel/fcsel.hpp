#pragma once

// Umbrella header for the analytics library (service headers excluded).

#include "fcsel/backtest.hpp"
#include "fcsel/dataset.hpp"
#include "fcsel/error.hpp"
#include "fcsel/json_io.hpp"
#include "fcsel/models.hpp"
#include "fcsel/month.hpp"
#include "fcsel/properties.hpp"
#include "fcsel/similarity.hpp"

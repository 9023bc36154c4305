#pragma once

#include "perex/errors.hpp"
#include "perex/figures.hpp"
#include "perex/io.hpp"
#include "perex/levy_model.hpp"
#include "perex/mc_check.hpp"
#include "perex/mc_oracle.hpp"
#include "perex/periodic_pricer.hpp"
#include "perex/philox.hpp"
#include "perex/roots.hpp"
#include "perex/scale_functions.hpp"

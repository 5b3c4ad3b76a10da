#pragma once

#include "feedersim/cli.hpp"
#include "feedersim/controllers.hpp"
#include "feedersim/curve.hpp"
#include "feedersim/errors.hpp"
#include "feedersim/harmonics.hpp"
#include "feedersim/inverter.hpp"
#include "feedersim/io_bundle.hpp"
#include "feedersim/io_json.hpp"
#include "feedersim/io_text.hpp"
#include "feedersim/metrics.hpp"
#include "feedersim/network.hpp"
#include "feedersim/phase.hpp"
#include "feedersim/power_flow.hpp"
#include "feedersim/profiles.hpp"
#include "feedersim/qsts.hpp"

#pragma once

#include "windtrip/cli.hpp"
#include "windtrip/control.hpp"
#include "windtrip/estimation.hpp"
#include "windtrip/filters.hpp"
#include "windtrip/logio.hpp"
#include "windtrip/mission.hpp"
#include "windtrip/recorder.hpp"
#include "windtrip/rng.hpp"
#include "windtrip/rotation.hpp"
#include "windtrip/scenario.hpp"
#include "windtrip/sensing.hpp"
#include "windtrip/summary.hpp"
#include "windtrip/trajectory.hpp"
#include "windtrip/vec3.hpp"
#include "windtrip/vehicle.hpp"
#include "windtrip/windfield.hpp"

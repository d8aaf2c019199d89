#pragma once

#include "tropism/actuation.hpp"
#include "tropism/common.hpp"
#include "tropism/controller.hpp"
#include "tropism/harness/config.hpp"
#include "tropism/harness/experiments.hpp"
#include "tropism/harness/export.hpp"
#include "tropism/harness/run.hpp"
#include "tropism/kinematics.hpp"
#include "tropism/sensing.hpp"
#include "tropism/world.hpp"

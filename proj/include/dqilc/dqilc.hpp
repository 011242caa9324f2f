#pragma once

#include "dqilc/dual_quaternion.hpp"
#include "dqilc/dual_vector.hpp"
#include "dqilc/error.hpp"
#include "dqilc/experiment.hpp"
#include "dqilc/ilc.hpp"
#include "dqilc/io.hpp"
#include "dqilc/quaternion.hpp"
#include "dqilc/rigid_body.hpp"
#include "dqilc/scenario.hpp"

#pragma once

#include "pi2aan/aan_supervisor.hpp"
#include "pi2aan/config.hpp"
#include "pi2aan/error.hpp"
#include "pi2aan/force_field.hpp"
#include "pi2aan/metrics.hpp"
#include "pi2aan/phase_kernel.hpp"
#include "pi2aan/pi2_core.hpp"
#include "pi2aan/protocol.hpp"
#include "pi2aan/stride.hpp"
#include "pi2aan/stride_log.hpp"
#include "pi2aan/subject_model.hpp"
#include "pi2aan/sweep.hpp"

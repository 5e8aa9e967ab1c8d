#pragma once

#include "techdebt/aha.hpp"
#include "techdebt/content.hpp"
#include "techdebt/default_pack.hpp"
#include "techdebt/digits.hpp"
#include "techdebt/policy.hpp"
#include "techdebt/rng.hpp"
#include "techdebt/rules.hpp"
#include "techdebt/serialize.hpp"
#include "techdebt/service.hpp"
#include "techdebt/session.hpp"
#include "techdebt/sim.hpp"
#include "techdebt/types.hpp"

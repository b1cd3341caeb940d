#pragma once

#include "witness/bloom.hpp"
#include "witness/common.hpp"
#include "witness/ledger.hpp"
#include "witness/select.hpp"
#include "witness/sim.hpp"
#include "witness/statement.hpp"
#include "witness/trace.hpp"
#include "witness/verify.hpp"

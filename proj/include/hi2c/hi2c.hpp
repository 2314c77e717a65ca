#pragma once

#include "hi2c/allocators.hpp"
#include "hi2c/core.hpp"
#include "hi2c/greedy.hpp"
#include "hi2c/model.hpp"
#include "hi2c/oracle.hpp"
#include "hi2c/orient.hpp"
#include "hi2c/post_process.hpp"
#include "hi2c/schedule.hpp"
#include "hi2c/slice_spread.hpp"

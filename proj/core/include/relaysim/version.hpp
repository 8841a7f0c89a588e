#pragma once

#define RELAYSIM_VERSION "0.1.0"

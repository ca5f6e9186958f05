#pragma once

#define CLASSO_VERSION_STRING "0.1.0"

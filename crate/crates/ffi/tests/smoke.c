#include <stdio.h>
#include <string.h>

#include "weil.h"

int main(void) {
    WeilAlgebraHandle *a = NULL;
    if (weil_algebra_parse("truncated(2,2)", &a) != WEIL_STATUS_OK) {
        fprintf(stderr, "%s\n", weil_last_error());
        return 1;
    }
    size_t dim = 0;
    weil_algebra_dim(a, &dim);
    weil_algebra_free(a);

    WeilReport *r = NULL;
    if (weil_demo("symplectic-r2n", true, 7, false, &r) != WEIL_STATUS_OK) {
        fprintf(stderr, "%s\n", weil_last_error());
        return 1;
    }
    bool passed = false;
    weil_report_passed(r, &passed);
    char *json = NULL;
    weil_report_render(r, WEIL_FORMAT_JSON, &json);
    int has_schema = strstr(json, "\"schema_version\": \"1\"") != NULL;
    weil_string_free(json);
    weil_report_free(r);

    if (weil_algebra_parse("jet(", &a) != WEIL_STATUS_INVALID_INPUT) {
        return 1;
    }
    printf("dim=%zu passed=%d schema=%d\n", dim, passed, has_schema);
    return 0;
}

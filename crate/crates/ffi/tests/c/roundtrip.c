#include <stdio.h>
#include <string.h>

#include "quadlat.h"

int main(void) {
    QlBochner *h = NULL;
    if (ql_bochner_racah("1", "1", "1", "1", &h) != QL_OK) {
        return 10;
    }
    char *s = NULL;
    if (ql_bochner_lambda(h, 2, &s) != QL_OK || strcmp(s, "-10") != 0) {
        return 11;
    }
    ql_string_free(s);

    int32_t pass = 0;
    if (ql_bochner_verify_json(h, "hahn,newchar", 8, &s, &pass) != QL_OK || pass != 1) {
        return 12;
    }
    ql_string_free(s);
    ql_bochner_free(h);

    QlBochner *bad = NULL;
    if (ql_bochner_racah("1/0", "1", "1", "1", &bad) != QL_ERR_PARSE || bad != NULL) {
        return 13;
    }
    if (ql_last_error() == NULL) {
        return 14;
    }
    printf("ok %s\n", ql_version());
    return 0;
}

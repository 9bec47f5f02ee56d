/**
 * @fileoverview Rule to check the spacing around the * in generator functions.
 * @author Jamund Ferguson
 */

"use strict";

module.exports = {
    meta: {
        docs: {
            description: "enforce consistent spacing around `*` operators in generator functions",
            category: "ECMAScript 6",
            recommended: false
        },
        fixable: "whitespace",
        schema: []
    },

    create(context) {

        const mode = (function(options) {
            if (!options || options.constructor === String) {
                return {
                    before: { before: true, after: false },
                    after: { before: false, after: true },
                    both: { before: true, after: true },
                    neither: { before: false, after: false }
                }[options || "before"];
            }
            return options;
        }(context.options[0]));

        const sourceCode = context.getSourceCode();

        function checkSpacing(side, leftToken, rightToken) {
            if (!!(rightToken.range[0] - leftToken.range[1]) !== mode[side]) {
                const after = leftToken.value === "*";
                const spaceRequired = mode[side];
                const node = after ? leftToken : rightToken;
                context.report({ node, message: "Missing space " + side + " *." });
            }
        }
    }
};

# Functional tests package
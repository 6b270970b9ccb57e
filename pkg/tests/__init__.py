# Test package for sepscope

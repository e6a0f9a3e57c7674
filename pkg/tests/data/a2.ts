states r0 r1
initial r0
events b c
arc r0 b r1
arc r1 c r0
